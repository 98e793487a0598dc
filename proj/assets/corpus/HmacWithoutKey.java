package mini;

import javax.crypto.Mac;
import javax.crypto.SecretKey;

public class HmacWithoutKey {

    /** Computes an hmac tag for the message. */
    public byte[] hmacTag(SecretKey key, byte[] message) throws Exception {
        Mac mac = Mac.getInstance("HmacSHA256");
        mac.init(key);
        return mac.doFinal(message);
    }
}
